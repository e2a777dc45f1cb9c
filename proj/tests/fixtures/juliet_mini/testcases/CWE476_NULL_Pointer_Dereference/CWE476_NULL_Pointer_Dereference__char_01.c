/* TEMPLATE GENERATED TESTCASE FILE (CRLF line endings)
Filename: CWE476_NULL_Pointer_Dereference__char_01.c
*/
#include "std_testcase.h"

#ifndef OMITBAD

void CWE476_NULL_Pointer_Dereference__char_01_bad()
{
    char * data;
    data = NULL;
    /* POTENTIAL FLAW: Attempt to use data, which may be NULL */
    printHexCharLine(*data);
}

#endif /* OMITBAD */

#ifndef OMITGOOD

static void goodG2B()
{
    char * data;
    char tmpData = 'C';
    data = &tmpData;
    printHexCharLine(*data);
}

void CWE476_NULL_Pointer_Dereference__char_01_good()
{
    goodG2B();
}

#endif /* OMITGOOD */
